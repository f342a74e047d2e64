/*
  level one
  /* level two */
int z;
