#pragma once

#include "srpedge/config.hpp"
#include "srpedge/cost.hpp"
#include "srpedge/eval.hpp"
#include "srpedge/feature.hpp"
#include "srpedge/fft.hpp"
#include "srpedge/geometry.hpp"
#include "srpedge/net.hpp"
#include "srpedge/pipeline.hpp"
#include "srpedge/signal.hpp"
#include "srpedge/simroom.hpp"
#include "srpedge/srp.hpp"
#include "srpedge/tensor_io.hpp"
#include "srpedge/wav.hpp"
