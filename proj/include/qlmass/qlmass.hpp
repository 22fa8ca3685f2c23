#pragma once

#include "qlmass/common.hpp"
#include "qlmass/convergence.hpp"
#include "qlmass/curvature_frames.hpp"
#include "qlmass/diagnostics.hpp"
#include "qlmass/harness.hpp"
#include "qlmass/mass_functionals.hpp"
#include "qlmass/metric_models.hpp"
#include "qlmass/quadrature.hpp"
#include "qlmass/taylor.hpp"
#include "qlmass/validation.hpp"
