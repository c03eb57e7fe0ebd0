#pragma once

#include <toroid/error.hpp>
#include <toroid/numerics.hpp>
#include <toroid/config.hpp>
#include <toroid/controller.hpp>
#include <toroid/ledger.hpp>
#include <toroid/market.hpp>
#include <toroid/adversary.hpp>
#include <toroid/harness.hpp>
