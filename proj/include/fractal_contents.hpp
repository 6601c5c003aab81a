#pragma once

#include "fractal_contents/errors.hpp"
#include "fractal_contents/steiner_algebra.hpp"
#include "fractal_contents/strings1d.hpp"
#include "fractal_contents/set_models.hpp"
#include "fractal_contents/estimators.hpp"
#include "fractal_contents/raster2d.hpp"
