#ifndef VEXACT_VEXACT_HPP
#define VEXACT_VEXACT_HPP

#include "vexact/baire1.hpp"
#include "vexact/comp_func.hpp"
#include "vexact/dyadic.hpp"
#include "vexact/enclosures.hpp"
#include "vexact/errors.hpp"
#include "vexact/genericity.hpp"
#include "vexact/interval.hpp"
#include "vexact/pi01.hpp"
#include "vexact/polytime.hpp"
#include "vexact/precision.hpp"
#include "vexact/rational.hpp"
#include "vexact/spec_io.hpp"
#include "vexact/volterra.hpp"

#endif  // VEXACT_VEXACT_HPP
