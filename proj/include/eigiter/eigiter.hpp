#pragma once

#include "error.hpp"
#include "dense.hpp"
#include "qr.hpp"
#include "lu.hpp"
#include "eigen_iter.hpp"
#include "eigen_multi.hpp"
#include "poly.hpp"
#include "convergence.hpp"
#include "matrix_market.hpp"
#include "families.hpp"
