#ifndef BMTRUNC_BMTRUNC_HPP
#define BMTRUNC_BMTRUNC_HPP

#include "bmtrunc/bmap.hpp"
#include "bmtrunc/bounds.hpp"
#include "bmtrunc/core.hpp"
#include "bmtrunc/model.hpp"
#include "bmtrunc/model_io.hpp"
#include "bmtrunc/optimize.hpp"
#include "bmtrunc/order.hpp"
#include "bmtrunc/perron.hpp"
#include "bmtrunc/solve.hpp"
#include "bmtrunc/truncate.hpp"

#endif  // BMTRUNC_BMTRUNC_HPP
