"""Constants and default settings for wgmsqueeze."""

PRESET_NAME = "paper-defaults"
PRESET_PACKAGE = "wgmsqueeze.presets"

# Seed used whenever --seed is not given.
DEFAULT_SEED = 20110214

MHZ = 1.0e6
KHZ = 1.0e3
MICROWATT = 1.0e-6

# Output tokens for values that are not numbers.
POLE_TOKEN = "inf-pole"
BELOW_THRESHOLD_TOKEN = "below-threshold"

NUMBER_FORMAT = "{:.9g}"

# Relative tolerances for construction-time invariants.
RATE_SUM_RTOL = 1.0e-12
CRITICAL_COUPLING_RTOL = 1.0e-9
CRITICAL_COUPLING_RATIO = 0.5

# Monte-Carlo generation works on fixed segments so results do not depend on worker count.
SEGMENT_SAMPLES = 65536
DEFAULT_WORKERS = 4

# Zero-span analyzer filters.
BANDPASS_ORDER = 2
VIDEO_ORDER = 1

# Fitting.
FIT_MAX_ITERATIONS = 500
FIT_OBJECTIVE_RTOL = 1.0e-10
FIT_CURVE_POINTS = 200
FIT_MIN_POINTS = 4
FIT_MIN_POWER_SPAN = 4.0

# Depth of the rendered pump transmission dip.
PUMP_DIP_DEPTH = 0.9

OUTPUT_FORMATS = ("csv", "json")
