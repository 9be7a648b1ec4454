"""Spiking-network training simulator with interchangeable synapse
backends: ideal analog STDP, level-quantized, single resistive device
and n-parallel devices with random single-device writes."""

from .crossbar import Arrangement, best_arrangement, max_read_error, read_error
from .dataset import CsvSchema, Dataset, Sample, load_csv, load_iris, normalize, split
from .device import (
    DeviceTable,
    ThresholdMemristor,
    WritePulseParams,
    build_table,
    default_memristor,
    default_pulse,
    device_delta_g,
    interpolate,
    load_table_csv,
    measure_stdp_protocol,
    net_voltage,
    overdrive,
    pulse_voltage,
    save_table_csv,
    table_from_model,
)
from .encoding import SensorBank, SpikeTrain, encode, encode_times
from .harness import (
    ExperimentConfig,
    RunStats,
    epochs_for_n,
    load_config,
    run_training,
    single_device_experiment,
    sweep_learning_rate,
    sweep_levels,
    sweep_n,
)
from .network import LifParams, Network, PairingEvent, PresentResult, encode_dataset
from .stdp import BiPooParams, StdpParams, delta_g_bipoo, delta_g_train, quantize
from .synapse import (
    IdealSynapses,
    MultiRramSynapses,
    QuantizedSynapses,
    SelectionScheme,
    SingleDeviceSynapses,
    SynapseArray,
    make_synapses,
    select_index,
)

__version__ = "0.1.0"
