# grown-up modules
import logging
import math

import numpy
from scipy import stats

# Below this distance the pathloss formula is outside its validity range.
MIN_DISTANCE = 10.0

class cell_config(object):
    """Class holding the radio parameters of the simulated cell."""
    def __init__(self,
                 cell_radius=2000.0,
                 carrier_freq=2.5,
                 bs_antenna_height=11.0,
                 client_antenna_height=1.0,
                 tx_power=20.0,
                 antenna_gain=0.0,
                 rb_bandwidth=1.8e6,
                 capacity_loss=1.6,
                 spectral_cap=4.8,
                 noise_density=-174.0,
                 noise_figure=7.0,
                 effective_noise=-125.4):
        """Construct a cell_config object.

        Arguments:
        cell_radius -- radius of the cell in meters
        carrier_freq -- carrier frequency in GHz
        bs_antenna_height -- base station antenna height in meters
        client_antenna_height -- client antenna height in meters
        tx_power -- client transmission power in dBm
        antenna_gain -- antenna gain in dBi (applied at both ends)
        rb_bandwidth -- bandwidth of the resource blocks assigned to a client in Hz
        capacity_loss -- Shannon capacity loss factor (Delta)
        spectral_cap -- maximum spectral efficiency in bit/s/Hz (rho_max)
        noise_density -- thermal noise density in dBm/Hz
        noise_figure -- receiver noise figure in dB
        effective_noise -- calibrated noise-plus-interference power in dBm; None derives it from
                           noise_density, rb_bandwidth and noise_figure
        """
        self.cell_radius = float(cell_radius)
        self.carrier_freq = float(carrier_freq)
        self.bs_antenna_height = float(bs_antenna_height)
        self.client_antenna_height = float(client_antenna_height)
        self.tx_power = float(tx_power)
        self.antenna_gain = float(antenna_gain)
        self.rb_bandwidth = float(rb_bandwidth)
        self.capacity_loss = float(capacity_loss)
        self.spectral_cap = float(spectral_cap)
        self.noise_density = float(noise_density)
        self.noise_figure = float(noise_figure)
        self.effective_noise = None if effective_noise is None else float(effective_noise)

        for name in ['cell_radius', 'carrier_freq', 'bs_antenna_height',
                     'client_antenna_height', 'rb_bandwidth', 'spectral_cap']:
            if getattr(self, name) <= 0:
                raise ValueError('cell parameter [{}] must be positive [{}]'
                                 .format(name, getattr(self, name)))

        if self.capacity_loss < 1:
            raise ValueError('capacity_loss must be at least 1 [{}]'.format(self.capacity_loss))

        if self.cell_radius < MIN_DISTANCE:
            raise ValueError('cell_radius must be at least {} m [{}]'
                             .format(MIN_DISTANCE, self.cell_radius))


    def noise_power(self):
        """Return the noise power in dBm used by the SNR computation."""
        if self.effective_noise is not None:
            return self.effective_noise

        return self.noise_density + 10.0 * math.log10(self.rb_bandwidth) + self.noise_figure


    def max_throughput(self):
        """Return the throughput cap rb_bandwidth * rho_max in bit/s."""
        return self.rb_bandwidth * self.spectral_cap


class client_resources(object):
    """Average resources of a client as reported in the Resource Request step."""
    def __init__(self, avg_throughput, avg_capability, r_var=0.0, distance=None):
        """Construct a client_resources object.

        Arguments:
        avg_throughput -- average uplink throughput theta^avg in bit/s
        avg_capability -- average computation capability gamma^avg in samples/s
        r_var -- relative half-width of the per-round fluctuation, in [0, 1)
        distance -- distance to the base station in meters, if known
        """
        self.avg_throughput = float(avg_throughput)
        self.avg_capability = float(avg_capability)
        self.r_var = float(r_var)
        self.distance = distance

        if self.avg_throughput <= 0:
            raise ValueError('average throughput must be positive [{}]'.format(avg_throughput))

        if self.avg_capability <= 0:
            raise ValueError('average capability must be positive [{}]'.format(avg_capability))

        if not 0 <= self.r_var < 1:
            raise ValueError('r_var must lie in [0, 1) [{}]'.format(r_var))


    def __repr__(self):
        return 'client_resources(theta={:.1f}, gamma={:.2f}, r_var={})'.format(
            self.avg_throughput, self.avg_capability, self.r_var)


def pathloss_db(distance, cfg):
    """Return the median UMi NLOS pathloss in dB.

    PL(d) = 36.7 log10(d) + 22.7 + 26 log10(f_GHz). Distances below 10 m are clamped.

    Arguments:
    distance -- distance to the base station in meters
    cfg -- cell_config
    """
    if distance < MIN_DISTANCE:
        logging.warning('distance [{}] m below the pathloss validity floor, clamped to [{}] m'
                        .format(distance, MIN_DISTANCE))
        distance = MIN_DISTANCE

    return 36.7 * math.log10(distance) + 22.7 + 26.0 * math.log10(cfg.carrier_freq)


def snr_linear(distance, cfg):
    """Return the linear signal-to-noise ratio of a client at `distance`."""
    received = cfg.tx_power + 2.0 * cfg.antenna_gain - pathloss_db(distance, cfg)
    return 10.0 ** ((received - cfg.noise_power()) / 10.0)


def capped_shannon_throughput(snr, cfg):
    """Return rb_bandwidth * min(rho_max, log2(1 + snr) / Delta) in bit/s."""
    return cfg.rb_bandwidth * min(cfg.spectral_cap, math.log2(1.0 + snr) / cfg.capacity_loss)


def mean_throughput(distance, cfg):
    """Return the average uplink throughput in bit/s of a client at `distance` meters."""
    return capped_shannon_throughput(snr_linear(distance, cfg), cfg)


def place_clients(K, cfg, rng):
    """Return K distances uniformly distributed over the area of the cell.

    Arguments:
    K -- number of clients
    cfg -- cell_config
    rng -- numpy Generator
    """
    u = rng.random(K)
    r0 = MIN_DISTANCE
    return numpy.sqrt(u * (cfg.cell_radius ** 2 - r0 ** 2) + r0 ** 2)


def population_throughput_stats(distances, cfg):
    """Return (mean, max) of the average throughputs at `distances`, in bit/s."""
    throughputs = numpy.array([mean_throughput(d, cfg) for d in distances])
    return float(throughputs.mean()), float(throughputs.max())


def generate_resources(distances, cfg, capability_range, r_var, rng):
    """Return a client_resources per distance with capability uniform in `capability_range`.

    Arguments:
    distances -- per-client distances from `place_clients`
    cfg -- cell_config
    capability_range -- (min, max) average capability in samples/s
    r_var -- fluctuation parameter attached to each client
    rng -- numpy Generator for the capabilities
    """
    low, high = capability_range
    capabilities = rng.uniform(low, high, size=len(distances))

    return [client_resources(mean_throughput(d, cfg), g, r_var, distance=float(d))
            for d, g in zip(distances, capabilities)]


def sample_round_value(avg, r_var, rng):
    """Return a realized per-round value around `avg`.

    The value follows a normal distribution with mean `avg` and standard deviation
    r_var * avg / 2 truncated to [(1 - r_var) avg, (1 + r_var) avg]. r_var = 0 returns `avg`
    without consuming randomness.

    Arguments:
    avg -- average value (> 0)
    r_var -- relative half-width of the interval, in [0, 1)
    rng -- numpy Generator
    """
    if avg <= 0:
        raise ValueError('average must be positive [{}]'.format(avg))

    if not 0 <= r_var < 1:
        raise ValueError('r_var must lie in [0, 1) [{}]'.format(r_var))

    if r_var == 0:
        return avg

    scale = r_var * avg / 2.0
    low, high = (1.0 - r_var) * avg, (1.0 + r_var) * avg

    # Standardized bounds are always -2 and 2 because the scale is tied to the half-width.
    value = stats.truncnorm.rvs(-2.0, 2.0, loc=avg, scale=scale, random_state=rng)

    return min(high, max(low, float(value)))


def update_time(n_samples, epochs, capability):
    """Return the seconds needed to run `epochs` passes over `n_samples` at `capability`.

    Arguments:
    n_samples -- number of local samples
    epochs -- number of epochs
    capability -- samples processed per second
    """
    if capability <= 0:
        raise ValueError('capability must be positive [{}]'.format(capability))

    return epochs * n_samples / capability


def upload_time(payload, throughput):
    """Return the seconds needed to send `payload` bytes at `throughput` bit/s."""
    if throughput <= 0:
        raise ValueError('throughput must be positive [{}]'.format(throughput))

    return 8.0 * payload / throughput


def dist_time(model_bytes, throughputs):
    """Return the multicast distribution time of the global model.

    The base station multicasts at the rate of the slowest receiver. No receivers means no
    distribution.

    Arguments:
    model_bytes -- size of the model payload in bytes
    throughputs -- throughputs of the receiving clients in bit/s
    """
    throughputs = list(throughputs)
    if not throughputs:
        return 0.0

    return upload_time(model_bytes, min(throughputs))
