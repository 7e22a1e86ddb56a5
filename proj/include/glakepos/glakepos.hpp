#pragma once

#include "glakepos/claims.hpp"
#include "glakepos/config.hpp"
#include "glakepos/dataset.hpp"
#include "glakepos/error.hpp"
#include "glakepos/hashing.hpp"
#include "glakepos/instances.hpp"
#include "glakepos/mask.hpp"
#include "glakepos/parallel.hpp"
#include "glakepos/raster_io.hpp"
#include "glakepos/seg_metrics.hpp"
#include "glakepos/synth.hpp"
#include "glakepos/templates.hpp"
#include "glakepos/text_metrics.hpp"
#include "glakepos/verify.hpp"
