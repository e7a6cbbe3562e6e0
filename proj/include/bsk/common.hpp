#pragma once

#include <stdexcept>
#include <string>

namespace bsk {

enum class Err {
  unknown_symbol,
  group_mismatch,
  not_free_group,
  illegal_path,
  unknown_vertex,
  injection_not_mono,
  container_violation,
  disconnected_graph,
  window_too_small,
  not_in_window,
  selection_outside_window,
  peripheral_not_malnormal,
  invalid_vertex_structure,
  disconnected_selection,
  empty_subgraph,
  hypothesis_failure,
  maximality_failure,
  isolation_failure,
  not_an_extension,
  missing_intersection_witness,
  parse_error,
  io_error,
  bad_input,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg)
      : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
  Err code() const { return code_; }
  const char* name() const { return err_name(code_); }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace bsk
