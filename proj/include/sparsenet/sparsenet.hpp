#ifndef SPARSENET_SPARSENET_HPP
#define SPARSENET_SPARSENET_HPP

// Everything in one include.
#include "sparsenet/activation.hpp"
#include "sparsenet/affine_system.hpp"
#include "sparsenet/approx.hpp"
#include "sparsenet/bitstream.hpp"
#include "sparsenet/cartoon.hpp"
#include "sparsenet/codec.hpp"
#include "sparsenet/error.hpp"
#include "sparsenet/format.hpp"
#include "sparsenet/fourier.hpp"
#include "sparsenet/generator.hpp"
#include "sparsenet/grid.hpp"
#include "sparsenet/lasso.hpp"
#include "sparsenet/learn.hpp"
#include "sparsenet/network.hpp"
#include "sparsenet/network_ops.hpp"
#include "sparsenet/nnet_io.hpp"
#include "sparsenet/quantize.hpp"
#include "sparsenet/shearlet.hpp"
#include "sparsenet/training.hpp"

#endif  // SPARSENET_SPARSENET_HPP
