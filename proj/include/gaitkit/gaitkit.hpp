#pragma once

// Convenience umbrella for the whole library.

#include "gaitkit/config.hpp"
#include "gaitkit/csv.hpp"
#include "gaitkit/param_extraction.hpp"
#include "gaitkit/pipeline.hpp"
#include "gaitkit/preprocessing.hpp"
#include "gaitkit/sinusoid_ekf.hpp"
#include "gaitkit/spectral_validation.hpp"
#include "gaitkit/yoyo_model.hpp"
