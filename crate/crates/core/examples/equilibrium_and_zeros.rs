//! Operating points of the reference plant and the zeros of its linearization.

use neurexcite::plant::{find_equilibrium, linearize, zeros_table, MachineParams};

fn main() -> neurexcite::Result<()> {
    let params = MachineParams::reference();
    let eq = find_equilibrium(&params, 1.1392)?;
    println!(
        "v_t = {:.6}  v_f = {:.6e}  delta = {:.4} rad  residual = {:.1e}",
        eq.v_t, eq.u, eq.state.delta, eq.residual
    );

    let lin = linearize(&params, &eq.state, eq.u)?;
    println!("c.b = {:.4}  (relative degree 1)", lin.cb());
    println!("open-loop poles:");
    for p in lin.poles() {
        println!("  {:+.4} {:+.4}i", p.re, p.im);
    }

    println!("\n  v_ref   max Re(zero)   minimum phase");
    for row in zeros_table(&params, &[1.0, 1.1392, 1.5, 2.0])? {
        println!(
            "  {:6.4}  {:+12.4}   {}",
            row.v_ref,
            row.max_real(),
            row.max_real() < 0.0
        );
    }
    Ok(())
}
