#pragma once

// Convenience umbrella for the whole library.
#include "qcbm/adam.hpp"
#include "qcbm/bits.hpp"
#include "qcbm/born_machine.hpp"
#include "qcbm/circuit_io.hpp"
#include "qcbm/data.hpp"
#include "qcbm/dataset_io.hpp"
#include "qcbm/error.hpp"
#include "qcbm/format.hpp"
#include "qcbm/gates.hpp"
#include "qcbm/kak.hpp"
#include "qcbm/mmd.hpp"
#include "qcbm/mps.hpp"
#include "qcbm/mps_decompose.hpp"
#include "qcbm/mps_io.hpp"
#include "qcbm/mps_train.hpp"
#include "qcbm/pipeline.hpp"
#include "qcbm/similarity.hpp"
#include "qcbm/statevector.hpp"
#include "qcbm/synthetic_rates.hpp"
#include "qcbm/timeseries.hpp"
