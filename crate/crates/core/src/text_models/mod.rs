//! Base text classifiers: multinomial Naive Bayes on bag-of-words counts and
//! softmax logistic regression on precomputed embeddings.

mod logistic;
mod naive_bayes;
mod posterior;

pub use logistic::{lr_objective, lr_posterior, lr_train, LogisticRegressionModel, LrConfig, LrFit};
pub use naive_bayes::{nb_log_scores, nb_posterior, nb_train, NaiveBayesModel};
pub use posterior::{argmax, PosteriorVector};
