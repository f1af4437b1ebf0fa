# grown-up modules
import json
import math

def get_json_from_file(target_file):
    """Return the JSON structure read out of `target_file`."""
    with open(target_file) as f:
        return json.load(f)


def sanitized(contents):
    """Return `contents` with non-finite floats replaced by None (JSON has no nan/inf)."""
    if isinstance(contents, dict):
        return {k: sanitized(v) for k, v in contents.items()}

    if isinstance(contents, (list, tuple)):
        return [sanitized(v) for v in contents]

    if isinstance(contents, float) and not math.isfinite(contents):
        return None

    return contents


def put_json_to_file(target_file, json_contents):
    """Write `json_contents` to `target_file` with sorted keys.

    Arguments:
    target_file -- path of the file to write
    json_contents -- JSON-serializable structure
    """
    with open(target_file, 'w') as f:
        json.dump(sanitized(json_contents), f, sort_keys=True, indent=4, allow_nan=False)
        f.write('\n')
