#ifndef TAUDOM_TAUDOM_HPP
#define TAUDOM_TAUDOM_HPP

#include "taudom/core.hpp"
#include "taudom/counting.hpp"
#include "taudom/dynamic1d.hpp"
#include "taudom/io.hpp"
#include "taudom/multidim.hpp"
#include "taudom/order_stat_tree.hpp"
#include "taudom/static1d.hpp"
#include "taudom/workload.hpp"

#endif
