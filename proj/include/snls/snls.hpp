#pragma once

#include "snls/complex.hpp"
#include "snls/error.hpp"
#include "snls/inequalities.hpp"
#include "snls/io.hpp"
#include "snls/mesh.hpp"
#include "snls/params.hpp"
#include "snls/solver.hpp"
#include "snls/sources.hpp"
#include "snls/stability.hpp"
#include "snls/support.hpp"
#include "snls/tridiag.hpp"
