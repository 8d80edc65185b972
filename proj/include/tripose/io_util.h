#ifndef TRIPOSE_IO_UTIL_H_
#define TRIPOSE_IO_UTIL_H_

#include <string>

namespace tripose {

// Writes via a temporary file in the same directory and renames on success,
// so failures never leave partial output behind.
void write_file_atomic(const std::string& path, const std::string& contents);

// Full-precision decimal formatting that round-trips doubles.
std::string format_double(double v);

}  // namespace tripose

#endif  // TRIPOSE_IO_UTIL_H_
