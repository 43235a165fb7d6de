pub mod crosscheck;
pub mod dist;
pub mod laguerre;
pub mod limits;
pub mod painleve;
