#pragma once

#include "gridhop/errors.hpp"
#include "gridhop/network.hpp"
#include "gridhop/balance.hpp"
#include "gridhop/security.hpp"
#include "gridhop/sizing.hpp"
#include "gridhop/econ.hpp"
#include "gridhop/document.hpp"
#include "gridhop/report.hpp"
#include "gridhop/fixtures.hpp"
