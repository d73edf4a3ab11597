use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{apply_delay, apply_discrete, enabled_discrete, initial_config, SemanticsError, TimedStep, Trace};
use crate::model::{valuate, GuardedPta, ParamValuation};
use crate::Scalar;

/// Random run of up to `steps` steps, deterministic in `seed`. Delays are
/// multiples of 1/4 in `(0, 2]`; a refused delay is retried with smaller
/// values. The run stops early in a configuration with no admissible step.
pub fn simulate<T: Scalar>(
    model: &GuardedPta,
    n: usize,
    v: &ParamValuation,
    steps: usize,
    seed: u64,
) -> Result<Trace<T>, SemanticsError> {
    let model = valuate(model, v)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = initial_config::<T>(&model, n)?;
    let mut trace = Trace::default();
    while trace.len() < steps {
        let enabled = enabled_discrete(&c, &model);
        let want_delay = enabled.is_empty() || rng.gen_bool(0.5);
        let mut delayed = false;
        if want_delay {
            let mut quarters = rng.gen_range(1..=8i64);
            while quarters > 0 {
                let d = T::from_fraction(quarters, 4);
                if let Some(next) = apply_delay(&c, &d, &model) {
                    c = next;
                    trace.steps.push(TimedStep::Delay(d));
                    delayed = true;
                    break;
                }
                quarters -= 1;
            }
        }
        if delayed {
            continue;
        }
        if enabled.is_empty() {
            break;
        }
        let (proc, edge) = enabled[rng.gen_range(0..enabled.len())];
        c = apply_discrete(&c, proc, edge, &model)?;
        trace.steps.push(TimedStep::Discrete { proc, edge });
    }
    Ok(trace)
}
