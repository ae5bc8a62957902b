//! Losses of the critic and generator with their exact parameter gradients.

use super::mlp::{leaky_relu, leaky_relu_derivative, GradBundle, MlpParams};
use crate::error::{check_len, Error, Result};

fn check_batch(context: &'static str, params: &MlpParams, batch: &[Vec<f64>]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch(context));
    }
    for x in batch {
        check_len(context, params.in_dim, x.len())?;
    }
    Ok(())
}

/// Adds `weight * dD(x)/dparams` into `grads` and returns `D(x)`.
fn accumulate_critic_grad(
    params: &MlpParams,
    x: &[f64],
    weight: f64,
    grads: &mut GradBundle,
    z: &mut [f64],
) -> f64 {
    params.pre_activations(x, z);
    let n = params.in_dim;
    let slope = params.hidden_slope;
    let mut value = params.b2[0];
    grads.b2[0] += weight;
    for (j, &zj) in z.iter().enumerate() {
        let h = leaky_relu(zj, slope);
        value += params.w2[j] * h;
        grads.w2[j] += weight * h;
        let a = weight * params.w2[j] * leaky_relu_derivative(zj, slope);
        grads.b1[j] += a;
        for (g, xi) in grads.w1[j * n..(j + 1) * n].iter_mut().zip(x) {
            *g += a * xi;
        }
    }
    value
}

/// `(1/S) sum_s [D(neg_s) - D(pos_s)]` and its gradient with respect to every
/// critic parameter.
pub fn critic_loss_param_grad(
    params: &MlpParams,
    batch_pos: &[Vec<f64>],
    batch_neg: &[Vec<f64>],
) -> Result<(f64, GradBundle)> {
    params.require_critic()?;
    check_batch("critic positive batch", params, batch_pos)?;
    check_batch("critic negative batch", params, batch_neg)?;
    check_len("critic batch length", batch_pos.len(), batch_neg.len())?;

    let inv_s = 1.0 / batch_pos.len() as f64;
    let mut grads = GradBundle::zeros_like(params);
    let mut z = vec![0.0; params.hidden_dim];
    let mut loss = 0.0;
    for (pos, neg) in batch_pos.iter().zip(batch_neg) {
        let d_neg = accumulate_critic_grad(params, neg, inv_s, &mut grads, &mut z);
        let d_pos = accumulate_critic_grad(params, pos, -inv_s, &mut grads, &mut z);
        loss += d_neg - d_pos;
    }
    Ok((loss * inv_s, grads))
}

/// Gradient penalty `(1/S) sum_s beta (||grad_x D(x_s)|| - 1)^2` and its
/// gradient with respect to the critic parameters.
///
/// The hidden activation is piecewise linear, so its second derivative is zero
/// almost everywhere and the penalty gradient only flows through `w1` and
/// `w2`. A sample whose input gradient is exactly zero contributes `beta` to
/// the penalty and nothing to the gradient.
pub fn gp_penalty_param_grad(
    params: &MlpParams,
    x_hat: &[Vec<f64>],
    beta: f64,
) -> Result<(f64, GradBundle)> {
    params.require_critic()?;
    check_batch("gradient penalty batch", params, x_hat)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "penalty factor must be finite and >= 0, got {beta}"
        )));
    }

    let n = params.in_dim;
    let slope = params.hidden_slope;
    let inv_s = 1.0 / x_hat.len() as f64;
    let mut grads = GradBundle::zeros_like(params);
    let mut z = vec![0.0; params.hidden_dim];
    let mut g = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut penalty = 0.0;

    for x in x_hat {
        params.critic_value_and_input_grad(x, &mut z, &mut g);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        penalty += beta * (norm - 1.0) * (norm - 1.0);
        if norm == 0.0 || beta == 0.0 {
            continue;
        }
        let scale = inv_s * 2.0 * beta * (norm - 1.0) / norm;
        for (uk, gk) in u.iter_mut().zip(&g) {
            *uk = scale * gk;
        }
        // g_k = sum_j w1[j,k] * w2[j] * s_j with s_j = leaky_relu'(z_j)
        for (j, &zj) in z.iter().enumerate() {
            let s = leaky_relu_derivative(zj, slope);
            let a = params.w2[j] * s;
            let row = &params.w1[j * n..(j + 1) * n];
            let mut row_dot_u = 0.0;
            for ((gw, w), uk) in grads.w1[j * n..(j + 1) * n].iter_mut().zip(row).zip(&u) {
                *gw += uk * a;
                row_dot_u += w * uk;
            }
            grads.w2[j] += s * row_dot_u;
        }
    }
    Ok((penalty * inv_s, grads))
}

/// Exploitation/exploration weights `(1/(1+lambda), lambda/(1+lambda))`.
///
/// The second weight is computed as the complement of the first, which makes
/// the pair sum to exactly 1.0 in floating point. `lambda = inf` gives `(0, 1)`.
pub fn mixture_weights(lambda: f64) -> Result<(f64, f64)> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "balancing coefficient must be >= 0, got {lambda}"
        )));
    }
    let w_exploit = 1.0 / (1.0 + lambda);
    Ok((w_exploit, 1.0 - w_exploit))
}

/// `-(1/S) sum_s sum_c weight_c * D_c(G(eta_s))` and its gradient with respect
/// to the generator parameters; critics are held fixed. Critics with zero
/// weight are skipped entirely.
pub fn generator_loss_weighted(
    gen: &MlpParams,
    critics: &[(&MlpParams, f64)],
    noise_batch: &[Vec<f64>],
) -> Result<(f64, GradBundle)> {
    check_batch("generator noise batch", gen, noise_batch)?;
    for (critic, _) in critics {
        critic.require_critic()?;
        check_len("critic input vs generator output", gen.out_dim, critic.in_dim)?;
    }
    let active: Vec<(&MlpParams, f64)> = critics
        .iter()
        .filter(|(_, w)| *w != 0.0)
        .map(|(c, w)| (*c, *w))
        .collect();

    let inv_s = 1.0 / noise_batch.len() as f64;
    let (n_in, n_hid, n_out) = (gen.in_dim, gen.hidden_dim, gen.out_dim);
    let slope = gen.hidden_slope;
    let mut grads = GradBundle::zeros_like(gen);
    let mut z = vec![0.0; n_hid];
    let mut o = vec![0.0; n_out];
    let mut y = vec![0.0; n_out];
    let mut dy = vec![0.0; n_out];
    let mut critic_z = vec![0.0; active.iter().map(|(c, _)| c.hidden_dim).max().unwrap_or(0)];
    let mut critic_g = vec![0.0; n_out];
    let mut delta_h = vec![0.0; n_hid];
    let mut loss = 0.0;

    for eta in noise_batch {
        gen.raw_output(eta, &mut z, &mut o);
        for k in 0..n_out {
            y[k] = gen.activate(k, o[k]);
        }
        dy.iter_mut().for_each(|v| *v = 0.0);
        for (critic, weight) in &active {
            let zc = &mut critic_z[..critic.hidden_dim];
            let value = critic.critic_value_and_input_grad(&y, zc, &mut critic_g);
            loss -= weight * value;
            for (d, g) in dy.iter_mut().zip(&critic_g) {
                *d -= inv_s * weight * g;
            }
        }
        // backpropagate dL/dy through the generator
        delta_h.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..n_out {
            let delta_o = dy[k] * gen.activation_derivative(k, o[k]);
            grads.b2[k] += delta_o;
            let w_row = &gen.w2[k * n_hid..(k + 1) * n_hid];
            let g_row = &mut grads.w2[k * n_hid..(k + 1) * n_hid];
            for j in 0..n_hid {
                g_row[j] += delta_o * leaky_relu(z[j], slope);
                delta_h[j] += w_row[j] * delta_o;
            }
        }
        for j in 0..n_hid {
            let delta_z = delta_h[j] * leaky_relu_derivative(z[j], slope);
            grads.b1[j] += delta_z;
            for (g, e) in grads.w1[j * n_in..(j + 1) * n_in].iter_mut().zip(eta) {
                *g += delta_z * e;
            }
        }
    }
    Ok((loss * inv_s, grads))
}

/// Generator loss balancing the exploitation critic `d_i` against the
/// exploration critic `d_r` with coefficient `lambda`.
pub fn generator_loss_param_grad(
    gen: &MlpParams,
    d_i: &MlpParams,
    d_r: &MlpParams,
    noise_batch: &[Vec<f64>],
    lambda: f64,
) -> Result<(f64, GradBundle)> {
    let (w_i, w_r) = mixture_weights(lambda)?;
    generator_loss_weighted(gen, &[(d_i, w_i), (d_r, w_r)], noise_batch)
}
