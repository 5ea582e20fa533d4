//! Choice between rayon and a plain loop for embarrassingly parallel work.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when the `parallel` feature is off.
    #[default]
    Parallel,
}

/// `(0..n).map(f).collect()`, in index order whatever the schedule.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_indexed(1000, Execution::Sequential, |i| i * i);
        let par = map_indexed(1000, Execution::Parallel, |i| i * i);
        assert_eq!(seq, par);
    }
}
