#pragma once

#include "crd/kernels/kernels.hpp"

namespace crd::kernels {

namespace scalar {
extern const KernelTable kTable;
}

namespace avx2 {
/// Null function pointers when the build target is not x86-64.
extern const KernelTable kTable;
extern const bool kCompiled;
}  // namespace avx2

}  // namespace crd::kernels
