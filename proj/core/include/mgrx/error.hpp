#ifndef MGRX_ERROR_HPP
#define MGRX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mgrx {

enum class errc {
  invalid_dims,
  depth_exceeded,
  invalid_level,
  invalid_axis,
  degenerate_line,
  degenerate_system,
  shape_error,
  invalid_budget,
  nonfinite_data,
  decode_error,
  not_an_artifact,
  unsupported_version,
  corrupt,
  undefined_psnr,
  invalid_input,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

} // namespace mgrx

#endif
