#pragma once

#include "bfexact/cdfq.hpp"
#include "bfexact/density.hpp"
#include "bfexact/error.hpp"
#include "bfexact/eval_result.hpp"
#include "bfexact/oracle.hpp"
#include "bfexact/params.hpp"
#include "bfexact/quadrature.hpp"
#include "bfexact/saddlepoint.hpp"
#include "bfexact/specfun.hpp"
#include "bfexact/tables.hpp"
#include "bfexact/tails.hpp"
#include "bfexact/welch.hpp"
#include "bfexact/welch_approx.hpp"
