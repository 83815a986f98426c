#pragma once

#include "godel/error.hpp"
#include "godel/expr.hpp"
#include "godel/linalg.hpp"
#include "godel/spacetime.hpp"
#include "godel/pathspace.hpp"
#include "godel/connect.hpp"
#include "godel/shoot.hpp"
#include "godel/hypotheses.hpp"
#include "godel/report.hpp"
#include "godel/config.hpp"
