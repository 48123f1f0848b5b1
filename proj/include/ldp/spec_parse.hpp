#pragma once

// Parsing of the CLI's protocol and prior spec strings.
//
// Protocols:  grr:a=4,eps=2.0   ue:a=3,kappa=0.5,lambda=0.2   oue:a=3,eps=1
//             rappor:a=3,eps=1  blh:eps=1,a=3   lh:a=3,g=2,eps=1
//             parity:a=4        id:a=3          or a path to a JSON file
// Priors:     jeffreys          dirichlet:0.5,0.5,1.0

#include <string>

#include "ldp/prior.hpp"
#include "ldp/protocol.hpp"

namespace ldp {

struct parse_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Parse a builtin protocol spec string.
Protocol parse_protocol_spec(const std::string& spec);

/// Spec string or (when the string names an existing file) a JSON protocol file.
Protocol load_protocol(const std::string& spec_or_path);

/// Parse a prior spec; `a` is the input size the prior must match.
DirichletPrior parse_prior_spec(const std::string& spec, int a);

}  // namespace ldp
