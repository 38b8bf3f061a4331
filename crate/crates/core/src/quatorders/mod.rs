//! Definite quaternion algebras, maximal and Eichler orders, right ideal
//! classes, and the optimal embedding of the ring class orders.

pub mod algebra;
pub mod order;
pub mod ideals;
pub mod splitting;
pub mod embedding;
