/**
 * Returns the size.
 * @return count
 */
int size();
