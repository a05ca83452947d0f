#pragma once

#include "mecb/clustering.hpp"
#include "mecb/coreset.hpp"
#include "mecb/dataset.hpp"
#include "mecb/distributed.hpp"
#include "mecb/errors.hpp"
#include "mecb/float_code.hpp"
#include "mecb/ml_eval.hpp"
#include "mecb/optimizer.hpp"
#include "mecb/quantizer.hpp"
#include "mecb/spectral.hpp"
