#pragma once

// Umbrella header: the complete elastic digital/analog radio-over-fiber
// simulation library.

#include "edarof/common.hpp"
#include "edarof/prng.hpp"
#include "edarof/fft.hpp"
#include "edarof/metrics.hpp"
#include "edarof/quantizer.hpp"
#include "edarof/plan.hpp"
#include "edarof/eda.hpp"
#include "edarof/ofdm.hpp"
#include "edarof/pulse.hpp"
#include "edarof/channel.hpp"
#include "edarof/pilot.hpp"
#include "edarof/rxdsp.hpp"
#include "edarof/chain.hpp"
#include "edarof/config.hpp"
#include "edarof/sweep.hpp"
#include "edarof/frame_io.hpp"
