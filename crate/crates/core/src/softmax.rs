/// Writes `exp(β·v_k − max) / Σ` into `out`.
///
/// Both the ant walk and the alignment Markov kernel go through this
/// function so that the κ = 1 walk and the kernel agree to the last bit.
pub fn softmax_into(beta: f64, values: &[f64], out: &mut [f64]) {
    let total = exp_weights_into(beta, values, out);
    for p in out.iter_mut() {
        *p /= total;
    }
}

/// Unnormalized `exp(β·v_k − max)` weights; returns their sum.
#[inline]
pub fn exp_weights_into(beta: f64, values: &[f64], out: &mut [f64]) -> f64 {
    debug_assert_eq!(values.len(), out.len());
    let max = values
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(beta * v));
    let mut total = 0.0;
    for (o, &v) in out.iter_mut().zip(values) {
        *o = (beta * v - max).exp();
        total += *o;
    }
    total
}
