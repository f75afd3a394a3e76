#ifndef DPC_CONTRACT_HPP
#define DPC_CONTRACT_HPP

#include <stdexcept>
#include <string>

namespace dpc {

/// Thrown when a documented precondition or invariant is violated.
/// The CLI maps this to exit code 3.
class contract_error : public std::logic_error {
public:
    explicit contract_error(const std::string& what) : std::logic_error(what) {}
};

namespace detail {
[[noreturn]] inline void contract_fail(const char* expr, const char* file, int line,
                                       const std::string& msg) {
    std::string full = std::string(file) + ":" + std::to_string(line) +
                       ": contract violated: " + expr;
    if (!msg.empty()) full += " (" + msg + ")";
    throw contract_error(full);
}
}  // namespace detail

}  // namespace dpc

#define DPC_REQUIRE(cond, msg)                                              \
    do {                                                                    \
        if (!(cond)) ::dpc::detail::contract_fail(#cond, __FILE__, __LINE__, (msg)); \
    } while (0)

#endif
