#include "zeno/errors.hpp"

namespace zeno {

void rethrow_with_context(const std::string& context) {
    const auto tag = [&](const std::exception& e) { return context + ": " + e.what(); };
    try {
        throw;
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(tag(e), e.last_residual(), e.iterations());
    } catch (const BlowUpError& e) {
        throw BlowUpError(tag(e), e.step());
    } catch (const BoundaryContaminationError& e) {
        throw BoundaryContaminationError(tag(e), e.time(), e.edge_density());
    } catch (const ParameterError& e) {
        throw ParameterError(tag(e));
    } catch (const PreconditionError& e) {
        throw PreconditionError(tag(e));
    } catch (const InvalidStateError& e) {
        throw InvalidStateError(tag(e));
    } catch (const Error& e) {
        throw Error(tag(e));
    }
}

}  // namespace zeno
