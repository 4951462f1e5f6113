#pragma once

// Umbrella header: the whole toolkit in one include.

#include "antispoof/audio.hpp"
#include "antispoof/config.hpp"
#include "antispoof/dataset.hpp"
#include "antispoof/dsp.hpp"
#include "antispoof/errors.hpp"
#include "antispoof/features.hpp"
#include "antispoof/formants.hpp"
#include "antispoof/gbdt.hpp"
#include "antispoof/metrics.hpp"
#include "antispoof/pitch.hpp"
#include "antispoof/rng.hpp"
#include "antispoof/run_config.hpp"
#include "antispoof/selection.hpp"
#include "antispoof/synth.hpp"
#include "antispoof/textio.hpp"
