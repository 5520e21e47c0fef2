//! Partial trace, partial transpose, realignment and the canonical
//! correlation matrix on the Bell projector.

use nlew::linalg::{
    correlation_matrix_canonical, hermitian_spectrum, partial_trace, partial_transpose,
    realignment, realignment_trace_norm, trace_norm, DimPair, Subsystem,
};
use nlew::states::{make_family_state, StateFamily};

fn main() -> nlew::Result<()> {
    let rho = make_family_state(StateFamily::PhiPlus, &[])?;
    let dims = DimPair::qubits();

    let rho_b = partial_trace(rho.matrix(), dims, Subsystem::A)?;
    println!("Tr_A |phi+><phi+| diagonal: {:?}", rho_b.diagonal());

    let pt = partial_transpose(rho.matrix(), dims, Subsystem::B)?;
    println!("spectrum of the partial transpose: {:?}", hermitian_spectrum(&pt)?.eigenvalues);

    let r = realignment(rho.matrix(), dims)?;
    println!("||R(rho)||_1 = {:.6}", trace_norm(&r));
    println!("via correlation matrix: {:.6}", realignment_trace_norm(rho.matrix(), dims)?);

    let c = correlation_matrix_canonical(rho.matrix(), dims)?;
    println!("C singular values: {:?}", c.singular_values());
    Ok(())
}
