#pragma once

// Everything except the command-line front end.

#include "sigcomp/alu.hpp"
#include "sigcomp/ca.hpp"
#include "sigcomp/comb.hpp"
#include "sigcomp/error.hpp"
#include "sigcomp/fft.hpp"
#include "sigcomp/io.hpp"
#include "sigcomp/reservoir.hpp"
#include "sigcomp/thue.hpp"
#include "sigcomp/vm.hpp"
