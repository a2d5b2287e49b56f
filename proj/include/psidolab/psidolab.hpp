#pragma once

// Umbrella header for the whole library.

#include "psidolab/bessel.hpp"
#include "psidolab/fourier.hpp"
#include "psidolab/grid.hpp"
#include "psidolab/io.hpp"
#include "psidolab/kato.hpp"
#include "psidolab/multiplier.hpp"
#include "psidolab/quantize.hpp"
#include "psidolab/schatten.hpp"
#include "psidolab/suites.hpp"
#include "psidolab/symbol_class.hpp"
#include "psidolab/version.hpp"
#include "psidolab/weyl.hpp"
