#ifndef CIRCDECONV_CIRCDECONV_HPP
#define CIRCDECONV_CIRCDECONV_HPP

/// Umbrella header: adaptive nonparametric deconvolution of a circular
/// density from a noisy sample and an independent error-calibration sample.

#include "circdeconv/circular.hpp"
#include "circdeconv/estimator.hpp"
#include "circdeconv/io.hpp"
#include "circdeconv/models.hpp"
#include "circdeconv/rng.hpp"
#include "circdeconv/selection.hpp"
#include "circdeconv/simulate.hpp"
#include "circdeconv/weight_classes.hpp"

#endif // CIRCDECONV_CIRCDECONV_HPP
