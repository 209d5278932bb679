#pragma once

/// @file dogip.hpp
/// Umbrella header.

#include "dogip/assembly.hpp"
#include "dogip/coefficient.hpp"
#include "dogip/core.hpp"
#include "dogip/csr.hpp"
#include "dogip/dofmap.hpp"
#include "dogip/lattice.hpp"
#include "dogip/mesh.hpp"
#include "dogip/metrics.hpp"
#include "dogip/operator.hpp"
#include "dogip/parallel.hpp"
#include "dogip/polynomial.hpp"
#include "dogip/quadrature.hpp"
#include "dogip/reference_element.hpp"
#include "dogip/report_io.hpp"
#include "dogip/solver.hpp"
#include "dogip/tensor.hpp"
