#pragma once

#include "affevo/types.hpp"
#include "affevo/spectral.hpp"
#include "affevo/curve.hpp"
#include "affevo/affine.hpp"
#include "affevo/evolutoid.hpp"
#include "affevo/parallel.hpp"
#include "affevo/discriminant.hpp"
#include "affevo/oracle.hpp"
