#pragma once

#include "analysis.hpp"
#include "betti.hpp"
#include "classify.hpp"
#include "common.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "knot.hpp"
#include "persistence.hpp"
#include "pipeline.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "stats.hpp"
#include "vec3.hpp"
