#pragma once

#include "classifier.hpp"
#include "discretization.hpp"
#include "entropy.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "minimizer.hpp"
#include "model.hpp"
#include "numerics.hpp"
#include "sampler.hpp"
#include "scenario.hpp"
#include "sir.hpp"
