#pragma once

#include <stdexcept>
#include <string>

namespace wflab {

// Point or field left the Fermi chart around the Clifford torus.
class chart_domain_error : public std::domain_error {
 public:
  explicit chart_domain_error(const std::string& what) : std::domain_error(what) {}
};

// det(sigma) dropped below the immersion threshold.
class immersion_error : public std::domain_error {
 public:
  explicit immersion_error(const std::string& what) : std::domain_error(what) {}
};

// min |A0|^2 dropped below the configured floor; the velocity is undefined there.
class umbilic_error : public std::domain_error {
 public:
  explicit umbilic_error(const std::string& what) : std::domain_error(what) {}
};

// A transformed torus is not a normal graph over the Clifford torus.
class not_a_graph_error : public std::runtime_error {
 public:
  explicit not_a_graph_error(const std::string& what) : std::runtime_error(what) {}
};

class insufficient_data_error : public std::runtime_error {
 public:
  explicit insufficient_data_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wflab
