#pragma once

#include "fitness_ifs/affine.hpp"
#include "fitness_ifs/csv.hpp"
#include "fitness_ifs/dense_set.hpp"
#include "fitness_ifs/exponents.hpp"
#include "fitness_ifs/intervals.hpp"
#include "fitness_ifs/limit_sampler.hpp"
#include "fitness_ifs/moments.hpp"
#include "fitness_ifs/particle.hpp"
#include "fitness_ifs/rng.hpp"
#include "fitness_ifs/stats.hpp"
