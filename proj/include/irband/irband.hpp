#pragma once

// Umbrella header for the library (the CLI layer lives in irband/cli.hpp).
#include "irband/bandsearch.hpp"
#include "irband/error.hpp"
#include "irband/report.hpp"
#include "irband/resample.hpp"
#include "irband/spectra_io.hpp"
#include "irband/spectrum.hpp"
