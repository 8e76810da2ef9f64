/// A collection of trainable tensors, visited in a fixed order.
///
/// Gradient containers reuse the parameter type so optimizers and the
/// gradient checker can walk both in lockstep.
pub trait Parameters {
    fn tensors(&self) -> Vec<&[f64]>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;

    fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn flatten(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    /// Overwrite all tensors from a flat slice produced by [`flatten`](Self::flatten).
    fn assign_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params(), "flat parameter length");
        let mut offset = 0;
        for t in self.tensors_mut() {
            let n = t.len();
            t.copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
    }

    fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}
