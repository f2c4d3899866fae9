#pragma once

#include "fracscale/fcfs.hpp"
#include "fracscale/tensor.hpp"

namespace fracscale {

/// Reference resize: for each output sample, gathers the interpolation taps
/// at u_d = m_d * s_d / r_d directly from x, resolving out-of-range indices by
/// clamping (Replicate), mirroring (Reflect) or zero extension (Zero).
///
/// Shares only weights_1d with the convolutional path. Use it to check
/// scale(), not for speed.
Tensor direct_resize(const Tensor& x, const ScaleJob& job);

} // namespace fracscale
