pub mod jacobi;
