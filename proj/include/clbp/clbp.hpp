#pragma once

// Umbrella header for the cLBP feature-extraction and benchmarking library.

#include "clbp/bench.hpp"
#include "clbp/classify.hpp"
#include "clbp/colorspace.hpp"
#include "clbp/dataset.hpp"
#include "clbp/decoder.hpp"
#include "clbp/error.hpp"
#include "clbp/feature_io.hpp"
#include "clbp/image.hpp"
#include "clbp/lbp.hpp"
#include "clbp/learning.hpp"
#include "clbp/noise.hpp"
#include "clbp/pipeline.hpp"
