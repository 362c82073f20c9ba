#pragma once

#include "sec/dataset.hpp"
#include "sec/diffusion.hpp"
#include "sec/error.hpp"
#include "sec/frames.hpp"
#include "sec/hodge1.hpp"
#include "sec/numerics.hpp"
#include "sec/pipeline.hpp"
#include "sec/pushforward.hpp"
#include "sec/tensors.hpp"
