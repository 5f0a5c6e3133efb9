#pragma once

#include "approxpriv/bsp.hpp"
#include "approxpriv/error.hpp"
#include "approxpriv/gallery.hpp"
#include "approxpriv/grid.hpp"
#include "approxpriv/io.hpp"
#include "approxpriv/par.hpp"
#include "approxpriv/partition.hpp"
#include "approxpriv/protocol.hpp"
#include "approxpriv/rational.hpp"
#include "approxpriv/svg.hpp"
#include "approxpriv/verify.hpp"
