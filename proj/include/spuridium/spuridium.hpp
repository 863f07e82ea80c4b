#ifndef SPURIDIUM_SPURIDIUM_HPP
#define SPURIDIUM_SPURIDIUM_HPP

// Umbrella header: pulls in the whole library.

#include "spuridium/basis.hpp"
#include "spuridium/diagnostics.hpp"
#include "spuridium/eigensolve.hpp"
#include "spuridium/hamiltonians.hpp"
#include "spuridium/linalg.hpp"
#include "spuridium/report.hpp"
#include "spuridium/runner.hpp"
#include "spuridium/version.hpp"

#endif  // SPURIDIUM_SPURIDIUM_HPP
