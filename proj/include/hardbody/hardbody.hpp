#pragma once

// Everything at once.

#include "hardbody/approx.hpp"
#include "hardbody/bodies.hpp"
#include "hardbody/centers.hpp"
#include "hardbody/design.hpp"
#include "hardbody/experiments.hpp"
#include "hardbody/hardness.hpp"
#include "hardbody/polarity.hpp"
#include "hardbody/report.hpp"
#include "hardbody/sampling.hpp"
#include "hardbody/solver.hpp"
