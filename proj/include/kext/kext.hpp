#pragma once

#include "kext/classify.hpp"
#include "kext/dynsys.hpp"
#include "kext/elliptic.hpp"
#include "kext/io.hpp"
#include "kext/ode.hpp"
#include "kext/periods.hpp"
#include "kext/quadrature.hpp"
#include "kext/rational.hpp"
#include "kext/separation.hpp"
#include "kext/spectral.hpp"
