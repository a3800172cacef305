#pragma once

#include "hmarea/analytic.hpp"
#include "hmarea/distortion.hpp"
#include "hmarea/errors.hpp"
#include "hmarea/parallel.hpp"
#include "hmarea/quadrature.hpp"
#include "hmarea/regions.hpp"
#include "hmarea/search.hpp"
